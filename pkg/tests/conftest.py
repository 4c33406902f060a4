from __future__ import annotations

import pytest

from proofsmith import HeuristicTagger, Lexicon, MockOracle, Proof, ProofStep
from proofsmith.oracle.mock import default_lexicon


@pytest.fixture(scope="session")
def oracle() -> MockOracle:
    return MockOracle()


@pytest.fixture(scope="session")
def tagger() -> HeuristicTagger:
    return HeuristicTagger()


@pytest.fixture(scope="session")
def search_lexicon() -> Lexicon:
    """Hand-authored lexicon for the search-equivalence fixture.

    Chains of depth two exist for several nouns and verbs so both search
    variants have real choices to make.
    """
    return Lexicon(
        hypernyms={
            "puppy": "dog",
            "dog": "animal",
            "cat": "animal",
            "animal": "creature",
            "guitar": "instrument",
            "piano": "instrument",
            "instrument": "object",
            "woman": "person",
            "man": "person",
            "boy": "child",
            "girl": "child",
            "child": "person",
            "person": "human",
            "car": "vehicle",
            "bicycle": "vehicle",
            "vehicle": "machine",
            "apple": "fruit",
            "fruit": "food",
            "ball": "toy",
            "toy": "object",
            "house": "building",
            "building": "structure",
            "sparrow": "bird",
            "bird": "animal",
            "oak": "tree",
            "tree": "plant",
            "runs": "moves",
            "walks": "moves",
            "jumps": "moves",
        },
        synonyms=(
            ("street", "road"),
            ("big", "large"),
            ("rock", "stone"),
            ("fast", "quick"),
            ("kid", "child"),
            ("sofa", "couch"),
            ("photo", "picture"),
        ),
        related=(
            ("snow", "cold", "winter"),
            ("beach", "sand", "ocean"),
        ),
    )


@pytest.fixture(scope="session")
def search_oracle(search_lexicon) -> MockOracle:
    return MockOracle(search_lexicon)


#: 20 (premise, hypothesis) pairs for search-equivalence checks. Some are
#: reachable in two steps, some in one, some not at all.
SEARCH_PAIRS = [
    ("a dog runs in the snow", "a creature moves in the snow"),
    ("a puppy runs in the park", "an animal moves in the park"),
    ("a woman plays a guitar", "a human plays an instrument"),
    ("a man rides a bicycle on the street", "a person rides a vehicle on the road"),
    ("a boy throws a ball", "a person throws a toy"),
    ("a girl eats an apple", "a child eats a fruit"),
    ("a cat jumps on the sofa", "a creature moves on the couch"),
    ("a sparrow sits on an oak", "an animal sits on a plant"),
    ("a kid holds a photo", "a person holds a picture"),
    ("a man walks on the beach", "a human moves on the sand"),
    ("a woman walks a dog", "a person walks an animal"),
    ("a big dog runs fast", "a large animal runs quick"),
    ("a car stops near a house", "a vehicle stops near a building"),
    ("a child plays with a toy", "a human plays with an object"),
    ("a piano stands in the house", "an instrument stands in a building"),
    ("a bird eats bread in winter", "an animal eats bread in the cold"),
    ("a man holds a rock", "a person holds a stone"),
    ("a puppy sleeps in the house", "a dog sleeps in a structure"),
    ("a woman runs on the street", "a human moves on the road"),
    ("a boy jumps over a rock", "a child moves over a stone"),
]


@pytest.fixture(scope="session")
def search_pairs() -> list[tuple[str, str]]:
    return list(SEARCH_PAIRS)


def _gold(premise, i1, i2, hypothesis) -> Proof:
    steps = [
        ProofStep(index=1, kind="inferred", text=i1, mode="entail", inputs=(0,)),
        ProofStep(index=2, kind="inferred", text=i2, mode="entail", inputs=(1,)),
    ]
    return Proof(premise=premise, hypothesis=hypothesis, label="entailment",
                 search_method="level", steps=steps)


#: Hand-written two-step chains that the default-lexicon judge accepts at
#: every consecutive pair; these play the role of the human-validated set.
GOLD_CHAINS = [
    ("a dog runs in the snow", "an animal runs in the snow",
     "a creature runs in the snow", "a creature moves in the snow"),
    ("a woman plays a guitar", "a woman plays an instrument",
     "a person plays an instrument", "a human plays an instrument"),
    ("a man rides a bicycle on the street", "a man rides a vehicle on the street",
     "a person rides a vehicle on the street", "a person rides a vehicle on the road"),
    ("a cat sleeps on the sofa", "an animal sleeps on the sofa",
     "an animal sleeps on the couch", "a creature sleeps on the couch"),
    ("a boy throws a frisbee", "a boy throws a toy",
     "a child throws a toy", "a person throws a toy"),
    ("a girl eats an apple", "a child eats an apple",
     "a person eats an apple", "a person eats food"),
    ("a sparrow sits on an oak", "a bird sits on an oak",
     "a bird sits on a tree", "an animal sits on a plant"),
    ("a kid holds a photo", "a child holds a photo",
     "a child holds a picture", "a person holds a picture"),
]


@pytest.fixture()
def gold_proofs() -> list[Proof]:
    return [_gold(*chain) for chain in GOLD_CHAINS]


@pytest.fixture()
def kb_file(tmp_path):
    path = tmp_path / "facts.txt"
    path.write_text(
        "\n".join([
            "# tiny commonsense fixture",
            "a guitar is an instrument",
            "a piano is an instrument",
            "a dog is an animal",
            "a frisbee is a toy",
            "an apple is a food",
            "a sofa is a couch",
            "a hand is a part of the arm",
            "an eye is used to see with",
            "a bicycle is a vehicle",
            "a sparrow is a bird",
        ]) + "\n",
        encoding="utf-8",
    )
    return path


@pytest.fixture()
def kb_tsv_file(tmp_path):
    path = tmp_path / "facts.tsv"
    path.write_text(
        "omcs-0001\tOMCS\ta guitar is an instrument\n"
        "gkb-0001\tGenericsKB\tan oak is a tree\n"
        "gkb-0002\tGenericsKB\ta cottage is a house\n",
        encoding="utf-8",
    )
    return path
