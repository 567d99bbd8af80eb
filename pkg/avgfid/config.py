import logging
from pathlib import Path

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict

from avgfid.documents import ChannelSpecDocument, GateSpecDocument, SpecModel, SpecSyntaxError, SpecValidationError, parse_channel_spec, parse_gate_spec, serialize_spec

logger = logging.getLogger(__name__)


class Settings(BaseSettings):
    """Runtime knobs that never change report contents."""

    model_config = SettingsConfigDict(env_file=".env", env_file_encoding="utf-8", extra="ignore")

    log_level: str = Field("INFO", validation_alias="AVGFID_LOG_LEVEL")
    workers: int = Field(1, ge=1, validation_alias="AVGFID_WORKERS")


class SpecLoader:
    def _read_file(self, file_path: Path) -> bytes:
        if not file_path.exists():
            raise SpecSyntaxError(f"Spec file not found: {file_path}")
        try:
            return file_path.read_bytes()
        except OSError as e:
            raise SpecSyntaxError(f"Cannot read spec file {file_path}: {e}") from e

    def load_channel(self, path: str) -> ChannelSpecDocument:
        file_path = Path(path)
        text = self._read_file(file_path)
        try:
            document = parse_channel_spec(text)
        except (SpecSyntaxError, SpecValidationError) as e:
            raise type(e)(f"{file_path}: {e}") from e
        logger.info(f"Loaded channel spec {file_path} (dim={document.dim}, type={document.channel.type})")
        return document

    def load_gate(self, path: str) -> GateSpecDocument:
        file_path = Path(path)
        text = self._read_file(file_path)
        try:
            document = parse_gate_spec(text)
        except (SpecSyntaxError, SpecValidationError) as e:
            raise type(e)(f"{file_path}: {e}") from e
        logger.info(f"Loaded gate spec {file_path} (dim={document.dim})")
        return document

    def save(self, document: SpecModel, path: str):
        file_path = Path(path)
        file_path.parent.mkdir(parents=True, exist_ok=True)
        file_path.write_bytes(serialize_spec(document))
        logger.info(f"Saved spec to {file_path}")
