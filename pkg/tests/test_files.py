"""
Unit tests for the filesys package.
"""

# local imports
from gradflow.filesys.dir import Dir
from gradflow.filesys.exceptions import (
    DirError,
    FileError,
    FileSystemObjectError,
    JsonFileError,
)
from gradflow.filesys.file import File
from gradflow.filesys.json_file import JSONFile
from gradflow.filesys.manager import FileSystemManager
from gradflow.filesys.object import FileSystemObject

# 3rd party imports
import pytest


@pytest.fixture
def data_dir(tmp_path):
    (tmp_path / "t10k-labels-idx1-ubyte.gz").write_bytes(b"\x1f\x8b")
    (tmp_path / "nested").mkdir()
    return tmp_path


def test_object_requires_str_path():
    with pytest.raises(TypeError):
        FileSystemObject(42)


def test_object_exists(data_dir):
    assert FileSystemObject(str(data_dir)).exists()
    missing = FileSystemObject(str(data_dir / "missing"))
    assert not missing.exists()
    with pytest.raises(FileSystemObjectError):
        missing.assert_exists()


def test_file_roundtrip_bytes(tmp_path):
    f = File(str(tmp_path / "ckpt.bin"))
    assert not f.exists()
    f.write_bytes(b"CNNCKPT1")
    assert f.exists()
    assert f.read_bytes() == b"CNNCKPT1"
    assert f.get_filename() == "ckpt.bin"
    assert f.get_file_extension() == "bin"
    f.write_bytes(b"")
    assert f.read_bytes() == b""


def test_file_rejects_directory(data_dir):
    f = File(str(data_dir / "nested"))
    assert "not a regular file" in f.check_exists()
    with pytest.raises(FileError):
        f.read_bytes()


def test_file_without_extension(tmp_path):
    assert File(str(tmp_path / "train-images-idx3-ubyte")).get_file_extension() is None


def test_dir_rejects_file(data_dir):
    d = Dir(str(data_dir / "t10k-labels-idx1-ubyte.gz"))
    assert not d.exists()
    with pytest.raises(DirError):
        d.assert_exists()


def test_dir_find_first_file(data_dir):
    d = Dir(str(data_dir))
    found = d.find_first_file(["t10k-labels-idx1-ubyte", "t10k-labels-idx1-ubyte.gz"])
    assert found is not None
    assert found.get_filename() == "t10k-labels-idx1-ubyte.gz"
    assert d.find_first_file(["train-labels-idx1-ubyte"]) is None


def test_dir_find_first_file_missing_dir(tmp_path):
    with pytest.raises(DirError):
        Dir(str(tmp_path / "missing")).find_first_file(["a"])


def test_json_file_roundtrip(tmp_path):
    report = JSONFile(str(tmp_path / "report.json"))
    report.write({"passed": True, "reports": [{"target": "fc"}]})
    assert report.read() == {"passed": True, "reports": [{"target": "fc"}]}


def test_json_file_rejects_extension_and_data(tmp_path):
    report = JSONFile(str(tmp_path / "report.txt"))
    assert report.check_has_json_extension() is not None
    with pytest.raises(JsonFileError):
        report.write({})
    with pytest.raises(TypeError):
        JSONFile(str(tmp_path / "report.json")).write(["not", "a", "dict"])


def test_json_file_read_missing(tmp_path):
    with pytest.raises(JsonFileError):
        JSONFile(str(tmp_path / "missing.json")).read()


def test_manager_output_path(tmp_path):
    manager = FileSystemManager()
    assert manager.is_valid_output_path(str(tmp_path / "ckpt.bin"))
    orphan = str(tmp_path / "missing" / "ckpt.bin")
    assert "missing" in manager.check_valid_output_path(orphan)
    with pytest.raises(FileSystemObjectError):
        manager.assert_valid_output_path(orphan)


def test_manager_rejects_directory_output(tmp_path):
    assert not FileSystemManager().is_valid_output_path(str(tmp_path))


def test_bare_filename_resolves_to_working_dir(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    assert FileSystemManager().is_valid_output_path("ckpt.bin")


def test_json_file_read_invalid(tmp_path):
    path = tmp_path / "report.json"
    path.write_text("{not json")
    with pytest.raises(JsonFileError):
        JSONFile(str(path)).read()
