from pathlib import Path
from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):

    # App Configuration
    data_dir: Path = Field(default=Path.home() / ".bebop", alias="BEBOP_DATA_DIR")
    log_level: str = Field(default="WARNING", alias="BEBOP_LOG_LEVEL")
    log_to_file: bool = Field(default=True, alias="BEBOP_LOG_TO_FILE")

    # Decoder limits
    decode_max_depth: int = Field(default=256, ge=1, alias="BEBOP_DECODE_MAX_DEPTH")
    decode_max_elements: int = Field(default=16 * 1024 * 1024, ge=1, alias="BEBOP_DECODE_MAX_ELEMENTS")

    # Compiler
    plugin_timeout: float = Field(default=60.0, gt=0, alias="BEBOP_PLUGIN_TIMEOUT")

    # RPC
    future_retention: int = Field(default=1000, ge=0, alias="BEBOP_FUTURE_RETENTION")
    rpc_host: str = Field(default="127.0.0.1", alias="BEBOP_RPC_HOST")
    rpc_port: int = Field(default=7300, alias="BEBOP_RPC_PORT")
    http_port: int = Field(default=7301, alias="BEBOP_HTTP_PORT")

    # Bench
    bench_iterations: int = Field(default=10, ge=1, alias="BEBOP_BENCH_ITERATIONS")
    bench_warmup: int = Field(default=3, ge=0, alias="BEBOP_BENCH_WARMUP")

    model_config = SettingsConfigDict(
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=False,
        extra="ignore",
        populate_by_name=True,
    )

    def __init__(self, **kwargs):
        super().__init__(**kwargs)
        try:
            self.data_dir.mkdir(parents=True, exist_ok=True)
        except OSError:
            # read-only home (CI sandboxes); file logging is skipped
            self.log_to_file = False


settings = Settings()
