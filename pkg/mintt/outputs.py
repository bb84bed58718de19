import logging
import os
import tempfile
from textwrap import dedent

from jinja2 import StrictUndefined, Template
from jinja2.exceptions import UndefinedError

from . import utils

log = logging.getLogger("mintt")


class OutputBuilder(utils.Tasks):
    """
    Collects the files a command produces as tasks keyed by their path
    relative to the output directory. A task holds either finished content or
    a jinja2 template rendered with the builder's context.
    """

    def __init__(self, context=None):
        self.tasks = {}
        self.base_context = dict(context or {})

    def content(self, task, content):
        self.tasks[task] = {"content": content}
        return self.tasks[task]

    def json(self, task, document):
        return self.content(task, utils.dump_json(document))

    def context(self):
        return dict(self.base_context)

    def render(self):
        """
        Render compiles each task template into the final content.
        """
        rendered_tasks = {}
        for path, template in self.tasks.items():
            log.debug("Rendering task: '{}'".format(path))
            if template.get("content") is not None:
                rendered_tasks[path] = template["content"]
                continue

            context = self.context()
            context.update(template.get("context") or {})
            template_path = template.get("template_path")
            if template_path is None:
                source = template.get("template")
            else:
                with open(template_path, "r") as f:
                    source = f.read()

            tmpl = Template(
                dedent(source),
                keep_trailing_newline=True,
                lstrip_blocks=True,
                trim_blocks=True,
                undefined=StrictUndefined,
            )
            tmpl.environment.globals.update(generated_header=utils.generated_header)
            try:
                rendered_tasks[path] = tmpl.render(context)
            except UndefinedError:
                log.error("An exception occured while rendering task '{}'".format(path))
                raise
        return rendered_tasks

    def run(self, out_dir):
        """
        Run renders every task and writes it below out_dir. Each file is
        written to a temporary name first and then moved into place.
        """
        rendered_tasks = self.render()
        for relpath, content in rendered_tasks.items():
            log.debug("Processing task: '{}'".format(relpath))
            abspath = os.path.join(out_dir, relpath)
            dirname = os.path.dirname(abspath)
            if dirname and not os.path.lexists(dirname):
                log.debug("Making directory '{}'".format(dirname))
                os.makedirs(dirname, exist_ok=True)
            write_atomic(abspath, content)
            log.info("Wrote '{}'".format(abspath))
        return rendered_tasks


def write_atomic(path, content):
    fd, tmp_path = tempfile.mkstemp(
        dir=os.path.dirname(path) or ".", prefix=".", suffix=".tmp"
    )
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as f:
            f.write(content)
        os.replace(tmp_path, path)
    except BaseException:
        if os.path.lexists(tmp_path):
            os.remove(tmp_path)
        raise
