import hashlib
import json
import os
from textwrap import dedent

import numpy as np

package_dir = os.path.abspath(os.path.dirname(os.path.abspath(__file__)))


class DictAttributes(dict):
    def __getattr__(self, attr):
        try:
            return self[attr]
        except KeyError:
            raise AttributeError(
                "'{}' has no attribute '{}'".format(self.__class__.__name__, attr)
            )


def RecursiveAttributes(item):
    if isinstance(item, dict) and not isinstance(item, DictAttributes):
        return RecursiveDictAttributes(item)
    return item


class RecursiveDictAttributes(DictAttributes):
    def __init__(self, item):
        super().__init__(item)
        for k, v in item.items():
            self[k] = RecursiveAttributes(v)

    def __setitem__(self, key, value):
        super().__setitem__(key, RecursiveAttributes(value))

    def __setattr__(self, attr, value):
        self[attr] = value


class Tasks(object):
    def task(self, task, content, context=None):
        self.tasks[task] = {"template": content, "context": context}
        return self.tasks[task]

    def task_template(self, task, path, context=None):
        path = os.path.join(package_dir, "templates", path)
        t = self.task(task, None, context)
        t["template_path"] = path
        return t


def to_jsonable(value):
    """Converts numpy containers and scalars into plain python values."""
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return to_jsonable(value.tolist())
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        value = float(value)
    if isinstance(value, float) and not np.isfinite(value):
        return None
    return value


def dump_json(document):
    return json.dumps(to_jsonable(document), indent=2, sort_keys=True) + "\n"


def config_hash(document):
    canonical = json.dumps(to_jsonable(document), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def generated_header(prefix="#"):
    if prefix:
        prefix = prefix + " "

    return dedent(
        """
            {prefix}This file was automatically generated by mint-t.
            {prefix}The same command and configuration reproduce it.
        """.format(
            prefix=prefix
        )
    ).strip()
