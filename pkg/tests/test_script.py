import pytest

from approxlis.errors import ScriptParseError
from approxlis.oracle import ReferenceModel
from approxlis.script import Command, UpdateScript, random_script, read_values

SAMPLE = """\
# preload, then a few updates
P 3 1 2

I 1 7
D 0
Q 0 2
QC 0 1
Q
"""


def test_parse_sample():
    script = UpdateScript.parse(SAMPLE)
    assert script.preload == [3, 1, 2]
    assert [c.op for c in script] == ["I", "D", "Q", "QC", "Q"]
    assert script.commands[0].args == (1, 7)
    assert script.commands[0].line == 4
    assert script.commands[-1].args == ()
    assert script.has_inserts


def test_dumps_parses_back():
    script = UpdateScript.parse(SAMPLE)
    again = UpdateScript.parse(script.dumps())
    assert again.preload == script.preload
    assert [(c.op, c.args) for c in again] == [(c.op, c.args) for c in script]


@pytest.mark.parametrize("text, line", [
    ("Q 0 1\nX 3\n", 2),
    ("P 1 2\nI 0\n", 2),
    ("D 0\nP 1 2\n", 2),
    ("\n\nQ a b\n", 3),
    ("D -1\n", 1),
    ("Q 0\n", 1),
])
def test_parse_errors_carry_line_numbers(text, line):
    with pytest.raises(ScriptParseError) as info:
        UpdateScript.parse(text)
    assert info.value.line == line
    assert f"line {line}" in str(info.value)


def test_negative_inserted_values_are_fine():
    script = UpdateScript.parse("I 0 -5\n")
    assert script.commands == [Command("I", (0, -5), 1)]


def test_read_values(tmp_path):
    path = tmp_path / "values.txt"
    path.write_text("3 1\n4 1 5\n")
    assert read_values(str(path)) == [3, 1, 4, 1, 5]
    path.write_text("3 1\n4 x\n")
    with pytest.raises(ScriptParseError) as info:
        read_values(str(path))
    assert info.value.line == 2


@pytest.mark.parametrize("seed", range(5))
def test_random_scripts_replay_cleanly(seed):
    script = random_script(seed, 200, preload=10, max_size=30)
    model = ReferenceModel(script.preload)
    for command in script:
        if command.op == "I":
            assert 0 <= command.args[0] <= len(model.values)
        elif command.op == "D":
            assert 0 <= command.args[0] < len(model.values)
        elif command.args:
            i, j = command.args
            assert 0 <= i <= j < len(model.values)
        model.apply(command)
        assert len(model.values) <= 30


def test_random_scripts_are_reproducible():
    assert random_script(4, 50).dumps() == random_script(4, 50).dumps()


def test_delete_only_scripts():
    script = random_script(1, 60, preload=20, insert_share=0.0)
    assert not script.has_inserts
