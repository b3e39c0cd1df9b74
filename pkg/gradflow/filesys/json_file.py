"""
JSON reports, such as the output of 'gradflow gradcheck --report'.
"""

# standard library imports
import json
import logging

# current package imports
from .exceptions import JsonFileError
from .file import File


class JSONFile(File):
    """A '.json' file holding one object."""

    def get_type(self) -> str:
        return "JSON file"

    def error_type(self) -> type[JsonFileError]:
        return JsonFileError

    def check_has_json_extension(self) -> str | None:
        ext = self.get_file_extension()
        if ext == "json":
            return None
        return f"Report path '{self._path}' must end in '.json', not '.{ext}'."

    def assert_has_json_extension(self) -> None:
        msg = self.check_has_json_extension()
        if msg is not None:
            logging.error(msg)
            raise JsonFileError(msg)

    def write(self, data: dict) -> None:
        """
        Serializes 'data' with an indent of 4, replacing the file.

        Raises
        ------
        TypeError
            If 'data' is not a dict.
        JsonFileError
            If the path does not end in '.json'.
        """
        self._type_checker.assert_type(data, "data", (dict,))
        self.assert_has_json_extension()
        self.write_bytes(json.dumps(data, indent=4).encode("utf-8"))

    def read(self) -> dict:
        """
        Raises
        ------
        JsonFileError
            If the file is missing or does not hold valid JSON.
        """
        text = self.read_bytes().decode("utf-8")
        try:
            return json.loads(text)
        except json.JSONDecodeError as e:
            msg = f"'{self._path}' does not hold valid JSON: {e}"
            logging.error(msg)
            raise JsonFileError(msg) from e
