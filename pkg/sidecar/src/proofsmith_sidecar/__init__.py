from .app import create_app, load_roles
from .config import ServerConfig, dummy_config, load_config
from .prefixes import PREFIXES, SEPARATOR, build_prompt

__all__ = [
    "PREFIXES",
    "SEPARATOR",
    "ServerConfig",
    "build_prompt",
    "create_app",
    "dummy_config",
    "load_config",
    "load_roles",
]
__version__ = "0.1.0"
