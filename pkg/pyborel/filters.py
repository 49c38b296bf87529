import re
import logging
from typing import Any, Dict

DEFAULT_MAX_DIGITS = 40


class LargeNumberAbbreviator:
    """
    Shorten factorial-sized integers before they reach a log line
    """

    def __init__(self, max_digits: int = DEFAULT_MAX_DIGITS, keep: int = 4):
        self.max_digits = max_digits
        self.keep = keep
        self._digit_run = re.compile(r"\d{%d,}" % (max_digits + 1))

    def abbreviate_digits(self, digits: str) -> str:
        """'1234...(2568 digits)...5678' for a run of more than max_digits digits"""
        if len(digits) <= self.max_digits:
            return digits
        return f"{digits[:self.keep]}…({len(digits)} digits)…{digits[-self.keep:]}"

    def abbreviate_text(self, text: str) -> str:
        return self._digit_run.sub(lambda m: self.abbreviate_digits(m.group(0)), text)

    def abbreviate_value(self, value: Any) -> Any:
        """Abbreviate ints and strings; leave everything else alone"""
        if value is None or isinstance(value, bool):
            return value
        if isinstance(value, int):
            text = str(value)
            if len(text.lstrip("-")) > self.max_digits:
                sign = "-" if value < 0 else ""
                return sign + self.abbreviate_digits(text.lstrip("-"))
            return value
        if isinstance(value, str):
            return self.abbreviate_text(value)
        return value


class LargeNumberFilter(logging.Filter):
    """
    Logging filter that abbreviates long digit runs in log records
    """

    def __init__(self, name: str = "", max_digits: int = DEFAULT_MAX_DIGITS):
        super().__init__(name)
        self.abbreviator = LargeNumberAbbreviator(max_digits)

    def filter(self, record: logging.LogRecord) -> bool:
        try:
            if hasattr(record, 'msg') and record.msg:
                record.msg = self._process_message(record.msg)

            if hasattr(record, 'args') and record.args:
                record.args = self._process_args(record.args)

        except Exception:
            # a record that cannot be shortened still goes out
            pass

        return True

    def _process_message(self, message: Any) -> Any:
        if isinstance(message, (str, int)):
            return self.abbreviator.abbreviate_value(message)
        elif isinstance(message, dict):
            return self._process_dict(message)
        return message

    def _process_args(self, args: Any) -> Any:
        if isinstance(args, tuple):
            return tuple(self._stringify(arg) for arg in args)
        elif isinstance(args, dict):
            return self._process_dict(args)
        return args

    def _stringify(self, arg: Any) -> Any:
        # long ints become strings, so pyborel formats numbers with %s, never %d
        if isinstance(arg, (str, int, dict)) or arg is None:
            return self._process_message(arg)
        text = str(arg)
        shortened = self.abbreviator.abbreviate_text(text)
        return shortened if shortened != text else arg

    def _process_dict(self, data: Dict) -> Dict:
        return {key: self.abbreviator.abbreviate_value(value) for key, value in data.items()}
