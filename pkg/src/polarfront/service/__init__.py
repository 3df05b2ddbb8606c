from .app import create_app
from .session import SessionState, session_from_document

__all__ = ["create_app", "SessionState", "session_from_document"]
