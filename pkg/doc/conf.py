#!/usr/bin/env python3
# -*- coding: utf-8 -*-
#
# ArgZeta documentation build configuration file.
#
# This file is execfile()d with the current directory set to its
# containing dir.

import sys, os, re

# The package is documented from the source tree.
sys.path.insert(0, os.path.abspath(".."))

# -- General configuration ------------------------------------------------

needs_sphinx = "1.6"

extensions = [
    "sphinx.ext.autodoc",
    "sphinx.ext.autosummary",
    "sphinx.ext.todo",
    "sphinx.ext.coverage",
    "sphinx.ext.mathjax",
    "sphinx.ext.napoleon",
    "sphinx.ext.intersphinx",
    "sphinx.ext.viewcode",
    "sphinx_automodapi.automodapi",
]

autosummary_generate = True
autosummary_imported_members = False
automodapi_toctreedirnm = "code/api"
automodsumm_inherited_members = True

source_suffix = ".rst"

master_doc = "index"

project = "ArgZeta"
copyright = "2026"
author = "ArgZeta developers"

add_module_names = False

import argzeta

# The full version, including alpha/beta/rc tags.
release = argzeta.__version__

# The short X.Y version.
version = re.match(r"^(\d+\.\d+)", release).expand(r"\1")

language = None

today_fmt = "%Y-%m-%d"

exclude_patterns = ["_build", "Thumbs.db", ".DS_Store"]

show_authors = True

pygments_style = "sphinx"

todo_include_todos = True

intersphinx_mapping = {
    "python": ("https://docs.python.org/3", None),
    "mpmath": ("https://mpmath.org/doc/current/", None),
    "numpy": ("https://numpy.org/doc/stable/", None),
    "scipy": ("https://docs.scipy.org/doc/scipy/", None),
}

# -- Options for HTML output ----------------------------------------------

html_theme = "alabaster"

htmlhelp_basename = "ArgZetadoc"

# -- Options for LaTeX output ---------------------------------------------

latex_elements = {}

latex_documents = [
    (master_doc, "ArgZeta.tex", "ArgZeta Documentation", author, "manual"),
]

# -- Options for manual page output ---------------------------------------

man_pages = [(master_doc, "argzeta", "ArgZeta Documentation", [author], 1)]

# ============================================================

# the order in which autodoc lists the documented members
autodoc_member_order = "bysource"

autosummary_generate = True
