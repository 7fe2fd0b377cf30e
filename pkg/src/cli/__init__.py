from .cli import main, build_parser, parse_arguments, EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_DIVERGENCE
from .run_config import RunConfig, UsageError, read_config_file, apply_config_file
from .commands import cmd_prepare, cmd_train_tokenizer, cmd_train, cmd_summarize, cmd_evaluate
