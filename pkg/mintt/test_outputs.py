import os

import pytest
from jinja2.exceptions import UndefinedError

from . import utils
from .outputs import OutputBuilder, write_atomic


@pytest.fixture
def table_context():
    return {
        "model_id": 3,
        "transform": "square",
        "rule": "deciles",
        "seeds": ["0", "1"],
        "timing": True,
        "rows": [
            {
                "method": "mint-t",
                "mse": "0.0123",
                "time": "0.5000",
                "range": "[0.1000, 0.9000]",
            },
            {
                "method": "reference",
                "mse": "0.0456",
                "time": "5.0000",
                "range": "[0.1000, 0.9000]",
            },
        ],
        "comparison": {"gain": "+73.03%", "acceleration": "10.00"},
    }


def test_render_content_and_json_tasks():
    outputs = OutputBuilder()
    outputs.content("notes.txt", "hello\n")
    outputs.json("data.json", {"b": 1, "a": [1.5, float("nan")]})
    rendered = outputs.render()
    assert rendered["notes.txt"] == "hello\n"
    assert rendered["data.json"] == utils.dump_json({"a": [1.5, None], "b": 1})


def test_render_inline_template_with_context():
    outputs = OutputBuilder({"name": "X1"})
    outputs.task("greeting.txt", "component {{ name }} at lag {{ lag }}\n", {"lag": 2})
    assert outputs.render()["greeting.txt"] == "component X1 at lag 2\n"


def test_render_raises_on_missing_variables():
    outputs = OutputBuilder()
    outputs.task("broken.txt", "{{ missing }}")
    with pytest.raises(UndefinedError):
        outputs.render()


def test_benchmark_table_template(table_context):
    outputs = OutputBuilder()
    outputs.task_template("table.txt", "benchmark_table.j2", table_context)
    table = outputs.render()["table.txt"]
    assert table.startswith(utils.generated_header())
    assert "Model 3  transform: square  rule: deciles  seeds: 0,1" in table
    assert "time/pair [s]" in table
    assert "reference" in table and "0.0456" in table and "5.0000" in table
    assert "relative gain of mint-t: +73.03%" in table
    assert "acceleration factor: 10.00" in table


def test_benchmark_table_template_without_timing(table_context):
    table_context.update(timing=False, comparison={"gain": "+1.00%"})
    outputs = OutputBuilder()
    outputs.task_template("table.txt", "benchmark_table.j2", table_context)
    table = outputs.render()["table.txt"]
    assert "time/pair" not in table
    assert "5.0000" not in table
    assert "relative gain of mint-t: +1.00%" in table
    assert "acceleration" not in table


def test_run_writes_every_task(tmp_path):
    outputs = OutputBuilder()
    outputs.content("a.txt", "A")
    outputs.content("nested/b.txt", "B")
    written = outputs.run(str(tmp_path / "out"))

    assert sorted(written) == ["a.txt", "nested/b.txt"]
    assert (tmp_path / "out" / "a.txt").read_text() == "A"
    assert (tmp_path / "out" / "nested" / "b.txt").read_text() == "B"
    leftovers = [name for name in os.listdir(tmp_path / "out") if name.endswith(".tmp")]
    assert leftovers == []


def test_write_atomic_replaces_existing_files(tmp_path):
    path = tmp_path / "report.json"
    path.write_text("old")
    write_atomic(str(path), "new")
    assert path.read_text() == "new"
    assert os.listdir(tmp_path) == ["report.json"]
