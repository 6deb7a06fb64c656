import os
import re
import sys
import importlib
import inspect
import coloredlogs, logging
import typing
from dotenv import load_dotenv

import config
from modules.module import LabError, InputError, DomainError, NumericalError, OrderingViolation

MODULES_PATH = os.path.join(os.path.dirname(os.path.abspath(__file__)), "modules")

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_ORDERING = 3

TRUE_WORDS = ("true", "1", "yes", "y")
FALSE_WORDS = ("false", "0", "no", "n")

"""
Blaschke Lab computes interpolation constants, quotient norms and bound tables
for finite Blaschke products.
"""
class BlaschkeLab:
    """
    Main function to run Blaschke Lab. Returns the process exit code.
    """
    def main(self, argv : list[str]|None = None) -> int:
        argv = sys.argv[1:] if argv is None else argv

        if len(argv) == 1 and argv[0] == "__autocomplete__modules":
            self._print_modules()
            return EXIT_OK

        if len(argv) == 2 and argv[0] == "__autocomplete__commands":
            self._print_commands(argv[1])
            return EXIT_OK

        load_dotenv()

        self.logger = self.init_logger()
        self.logger.debug("Blaschke Lab v0.1.0")

        if len(argv) == 0 or argv[0] == "help":
            help_module = argv[1] if len(argv) > 1 else None
            self.print_help(help_module)
            return EXIT_OK

        if not self.check_environment():
            return EXIT_INPUT

        module = argv[0]
        command = argv[1] if len(argv) > 1 else None
        args = argv[2:]

        if not self.exists_module(module):
            self.logger.error(f"Module {module} does not exist")
            self.print_help()
            return EXIT_INPUT

        module_instance = self.load_module(module)
        if module_instance is None:
            return EXIT_INPUT

        if not command:
            self.logger.error("Command is required")
            module_instance.print_help()
            return EXIT_INPUT

        # Only the listed commands are callable from the command line
        if command not in module_instance.COMMANDS:
            self.logger.error(f"Command {command} does not exist in module {module}")
            module_instance.print_help()
            return EXIT_INPUT

        command_instance = getattr(module_instance, command)

        self.logger.debug(f"Running command {command} in module {module}")
        kwargs = self.prepare_args(command_instance, args)

        if kwargs is None:
            return EXIT_INPUT

        self.logger.debug(f"Calling command {command} with arguments {kwargs}")

        try:
            response = command_instance(**kwargs)
        except OrderingViolation as e:
            self.logger.error(f"Ordering violation: {e}")
            return EXIT_ORDERING
        except (InputError, DomainError, NumericalError) as e:
            self.logger.error(f"{type(e).__name__}: {e}")
            return EXIT_INPUT
        except LabError as e:
            self.logger.error(f"{type(e).__name__}: {e}")
            return EXIT_INPUT

        if isinstance(response, list):
            for item in response:
                self.logger.debug(f"[{module}.{command}] {item}")
        else:
            self.logger.debug(f"[{module}.{command}] {response}")

        return EXIT_OK

    """
    Bind positional arguments and --name value / --name=value options to the command
    signature, converting each value by its type hint.

    @return: Keyword arguments, or None when the arguments do not fit
    """
    def prepare_args(self, command_instance, args : list[str]) -> dict|None:
        signature = inspect.signature(command_instance)
        arg_types = typing.get_type_hints(command_instance)
        names = list(signature.parameters)

        module_name = command_instance.__module__.split(".")[-1]
        command_name = command_instance.__name__

        positional = []
        options = {}

        i = 0
        while i < len(args):
            arg = args[i]

            if arg.startswith("--"):
                name, _, value = arg[2:].partition("=")
                name = name.replace("-", "_")

                if not _:
                    if i + 1 >= len(args):
                        self.logger.error(f"Option --{name} needs a value")
                        return None
                    i += 1
                    value = args[i]

                if name not in names:
                    self.logger.error(f"Unknown option --{name} for command {module_name}.{command_name}")
                    return None

                options[name] = value
            else:
                positional.append(arg)

            i += 1

        if len(positional) > len(names):
            self.logger.error(f"Too many arguments for command {module_name}.{command_name}")
            return None

        raw = dict(zip(names, positional))
        for name, value in options.items():
            if name in raw:
                self.logger.error(f"Argument {name} given twice")
                return None
            raw[name] = value

        missing = [name for name, parameter in signature.parameters.items() if parameter.default is inspect.Parameter.empty and name not in raw]
        if missing:
            self.logger.error(f"Not enough arguments provided for command {module_name}.{command_name}")

            argname_type_list = []
            for name, parameter in signature.parameters.items():
                arg_type = getattr(self.unwrap_optional(arg_types.get(name, str)), "__name__", "str")

                if parameter.default is inspect.Parameter.empty:
                    argname_type_list.append(f"<{name}: {arg_type}>")
                else:
                    argname_type_list.append(f"[{name}: {arg_type} = {parameter.default}]")

            self.logger.error(f"Usage: {module_name} {command_name} {' '.join(argname_type_list)}")

            return None

        kwargs = {}
        for name, value in raw.items():
            arg_type = self.unwrap_optional(arg_types.get(name, str))

            self.logger.debug(f"Expected type for {name} with value {value}: {arg_type}")

            try:
                kwargs[name] = self.convert(value, arg_type)
            except ValueError:
                self.logger.error(f"Argument {name} expects {arg_type.__name__}, got {value}")
                return None

        return kwargs

    @staticmethod
    def unwrap_optional(arg_type):
        choices = [choice for choice in typing.get_args(arg_type) if choice is not type(None)]
        return choices[0] if choices else arg_type

    @staticmethod
    def convert(value : str, arg_type):
        if arg_type == bool:
            if value.lower() in TRUE_WORDS:
                return True
            if value.lower() in FALSE_WORDS:
                return False
            raise ValueError(value)

        if arg_type == int:
            return int(value)

        if arg_type == float:
            return float(value)

        return value

    """
    Initialize logging. Logs go to stderr; command output stays on stdout.
    """
    def init_logger(self):
        self.LOG_LEVEL = os.getenv("BLASCHKE_LAB_LOG_LEVEL")

        if self.LOG_LEVEL is None:
            self.LOG_LEVEL = "INFO"

        coloredlogs.install(level=self.LOG_LEVEL, stream=sys.stderr)
        logger = logging.getLogger('core')

        logger.debug(f"Logging level set to {self.LOG_LEVEL}")

        return logger

    """
    Check the environment variables.
    """
    def check_environment(self) -> bool:
        self.logger.debug("Checking environment variables")

        threads = os.getenv("BLASCHKE_LAB_THREADS")
        if threads is None or threads.strip() == "":
            config.set_threads(1)
        else:
            try:
                config.set_threads(config.parse_threads(threads.strip()))
            except InputError as e:
                self.logger.error(str(e))
                return False

        self.logger.debug(f"BLASCHKE_LAB_THREADS: {config.get_threads()}")

        return True

    """
    Print help message.
    """
    def print_help(self, module : str|None = None):

        if not module:
            module_names = self.get_module_names(include_help=True)

            self.logger.info(f"Usage: python3 {os.path.basename(__file__)} <module> <command> [args] [--name value]")
            self.logger.info("")
            self.logger.info("General Commands:")
            self.logger.info("  help: Print this help message")
            self.logger.info("  help <module>: Print help message for a module")
            self.logger.info("")
            self.logger.info("Modules:")

            for module_name in module_names:
                if module_name == "help":
                    continue
                module_type = self.load_module(module_name, instantiate=False, no_print=True)
                commands = ", ".join(module_type.COMMANDS) if module_type and module_type.COMMANDS else "library only"
                self.logger.info(f"  {module_name}: {commands}")

            self.logger.info("")
            self.logger.info("Examples:")
            self.logger.info(f"  python3 {os.path.basename(__file__)} bounds report sigma.json --space bergman - Bound report for a node set")
            self.logger.info(f"  python3 {os.path.basename(__file__)} bounds sandwich --n 8 --r 0.5 - Two-sided sandwich in H^2")
            self.logger.info(f"  python3 {os.path.basename(__file__)} solvers np sigma.json values.json - Nevanlinna-Pick value")

        else:
            if not self.exists_module(module):
                self.logger.error(f"Module {module} does not exist")
                self.print_help()
                return

            module_instance = self.load_module(module)
            if module_instance is not None:
                module_instance.print_help()

    """
    Check if a module exists.
    """
    def exists_module(self, module : str) -> bool:
        return module in self.get_module_names()

    @staticmethod
    def class_name(module : str) -> str:
        return "".join(part.capitalize() for part in re.split(r"[-_]", module))

    """
    Load a module from modules/<module>/__init__.py and return the class instance (or type).
    Each module implements the Module class from modules/module.py
    """
    def load_module(self, module : str, instantiate : bool = True, no_print : bool = False):
        if not no_print:
            self.logger.debug(f"Loading modules/{module} ...")

        module_loader = importlib.import_module(f"modules.{module}")
        class_name = self.class_name(module)

        if not hasattr(module_loader, class_name):
            if not no_print:
                self.logger.error(f"Module {module} does not have a valid class")
            return None

        module_type = getattr(module_loader, class_name)

        if not instantiate:
            return module_type

        try:
            return module_type()
        except Exception as e:
            if not no_print:
                self.logger.error(f"Failed to create instance of module {module}: {e}")
            return None

    """
    Get all module names.

    @return: List of module names
    """
    def get_module_names(self, include_help : bool = False) -> list[str]:
        module_names = []
        for folder in sorted(os.listdir(MODULES_PATH)):
            init_path = os.path.join(MODULES_PATH, folder, "__init__.py")

            # Append only those modules that have an __init__.py file with a class that is a subclass of Module
            if os.path.isfile(init_path):
                with open(init_path, "r") as file:
                    contents = file.read()
                    class_pattern = re.compile(rf"class\s+{self.class_name(folder)}\s*\(\s*Module\s*\)\s*:")

                    if class_pattern.search(contents):
                        module_names.append(folder)

        if include_help:
            module_names.append("help")

        return module_names

    """
    Internal function for bash autocomplete.
    """
    def _print_modules(self):
        module_names = self.get_module_names(include_help=True)
        print(" ".join(module_names))

    """
    Internal function for bash autocomplete.
    """
    def _print_commands(self, module : str):
        if module == "help" or module not in self.get_module_names():
            return

        module_instance = self.load_module(module, no_print=True)
        if module_instance is not None:
            module_instance.print_commands()

if __name__ == "__main__":
    sys.exit(BlaschkeLab().main())
