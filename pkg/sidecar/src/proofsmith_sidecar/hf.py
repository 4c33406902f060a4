"""Checkpoint-backed engines. Imported lazily so the server (and its
tests) run without torch/transformers installed."""
from __future__ import annotations

import numpy as np


class HFGenerator:
    """Seq2seq beam decoding over a text-to-text checkpoint."""

    def __init__(self, checkpoint: str, device: str = "cpu"):
        from transformers import AutoModelForSeq2SeqLM, AutoTokenizer

        self.checkpoint_id = checkpoint
        self.device = device
        self.tokenizer = AutoTokenizer.from_pretrained(checkpoint)
        self.model = AutoModelForSeq2SeqLM.from_pretrained(checkpoint).to(device).eval()

    def generate(self, prompt: str, beam: int, num_return: int):
        import torch

        inputs = self.tokenizer(prompt, return_tensors="pt", truncation=True).to(self.device)
        with torch.no_grad():
            output = self.model.generate(
                **inputs,
                num_beams=beam,
                num_return_sequences=min(beam, num_return),
                max_new_tokens=64,
                early_stopping=True,
                output_scores=True,
                return_dict_in_generate=True,
            )
        texts = self.tokenizer.batch_decode(output.sequences, skip_special_tokens=True)
        scores = output.sequences_scores.tolist() if output.sequences_scores is not None \
            else [-float(i) for i in range(len(texts))]
        return list(zip(texts, [float(s) for s in scores]))


class HFEmbedder:
    """Sentence-transformers encoder; rows are re-normalized server-side."""

    def __init__(self, checkpoint: str = "sentence-transformers/all-mpnet-base-v2",
                 device: str = "cpu"):
        from sentence_transformers import SentenceTransformer

        self.checkpoint_id = checkpoint
        self.model = SentenceTransformer(checkpoint, device=device)
        self.dim = int(self.model.get_sentence_embedding_dimension())

    def embed(self, texts):
        rows = np.asarray(self.model.encode(list(texts), normalize_embeddings=True,
                                            show_progress_bar=False), dtype=float)
        return rows / np.linalg.norm(rows, axis=1, keepdims=True)


class HFJudge:
    """NLI classifier producing (entail, neutral, contradict) triples."""

    def __init__(self, checkpoint: str = "roberta-large-mnli", device: str = "cpu"):
        from transformers import AutoModelForSequenceClassification, AutoTokenizer

        self.checkpoint_id = checkpoint
        self.device = device
        self.tokenizer = AutoTokenizer.from_pretrained(checkpoint)
        self.model = AutoModelForSequenceClassification.from_pretrained(checkpoint) \
            .to(device).eval()
        labels = {i: lab.lower() for i, lab in self.model.config.id2label.items()}
        self._order = {}
        for idx, label in labels.items():
            if "entail" in label:
                self._order["entail"] = idx
            elif "neutral" in label:
                self._order["neutral"] = idx
            elif "contra" in label:
                self._order["contradict"] = idx
        if len(self._order) != 3:
            raise ValueError(f"cannot map NLI labels from {labels}")

    def judge(self, pairs):
        import torch

        premises = [p for p, _ in pairs]
        hypotheses = [h for _, h in pairs]
        inputs = self.tokenizer(premises, hypotheses, return_tensors="pt", padding=True,
                                truncation=True).to(self.device)
        with torch.no_grad():
            probs = torch.softmax(self.model(**inputs).logits, dim=-1).cpu().numpy()
        out = []
        for row in probs:
            out.append((float(row[self._order["entail"]]),
                        float(row[self._order["neutral"]]),
                        float(row[self._order["contradict"]])))
        return out
