from .app import build_app, create_app
from .state import AnnotationService, ServiceError

__all__ = ["AnnotationService", "ServiceError", "build_app", "create_app"]
