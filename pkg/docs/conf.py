# -*- coding: utf-8 -*-

import polylog_periods

extensions = [
    "sphinx.ext.autodoc",
    "sphinx.ext.autosummary",
    "sphinx.ext.doctest",
    "sphinx.ext.intersphinx",
    "sphinx.ext.mathjax",
    "sphinx.ext.viewcode",
    "numpydoc",
    "sphinx_click.ext",
]

# -- sphinx.ext.autodoc
autoclass_content = "both"  # class and __init__ docstrings are concatenated
autodoc_default_options = {"members": None}
autodoc_member_order = "bysource"  # default is alphabetical

# -- sphinx.ext.doctest
doctest_global_setup = """
import numpy as np
import polylog_periods
"""

# -- sphinx.ext.intersphinx
intersphinx_mapping = {
    "nengo": ("https://www.nengo.ai/nengo/", None),
    "numpy": ("https://numpy.org/doc/stable", None),
    "python": ("https://docs.python.org/3", None),
    "sympy": ("https://docs.sympy.org/latest", None),
}

# -- numpydoc config
numpydoc_show_class_members = False

# -- sphinx
exclude_patterns = ["_build"]
source_suffix = ".rst"
source_encoding = "utf-8"
master_doc = "index"
default_role = "py:obj"
pygments_style = "sphinx"

project = "polylog_periods"
authors = "polylog-periods developers"
copyright = "2026 polylog-periods developers"
version = ".".join(polylog_periods.__version__.split(".")[:2])  # Short X.Y version
release = polylog_periods.__version__  # Full version, with tags

# -- HTML output
html_theme = "alabaster"
html_title = "polylog_periods {0} docs".format(release)
htmlhelp_basename = "polylog_periods"
html_show_sphinx = False
