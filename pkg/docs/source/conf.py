# Configuration file for the Sphinx documentation builder.
# https://www.sphinx-doc.org/en/master/usage/configuration.html

import os
import sys

import sphinx_rtd_theme  # noqa: F401

# the package is imported from the source tree, not an installed copy
sys.path.insert(0, os.path.abspath('../..'))


def get_version(path: str):
    temporary_globals = {}  # type: ignore
    with open(path) as f:
        exec(f.read(), temporary_globals)

    return temporary_globals["__version__"]


# -- Project information -----------------------------------------------------

project = 'isocube'
copyright = '2026, isocube developers'
author = 'isocube developers'
release = get_version('../../isocube/_version.py')


# -- General configuration ---------------------------------------------------

extensions = [
    'sphinx.ext.githubpages',
    'sphinx.ext.autodoc',
    'sphinx.ext.autosummary',
    'sphinx.ext.intersphinx',
    'sphinx.ext.mathjax',
    'sphinx.ext.napoleon',
    'sphinx_rtd_theme',
    'myst_parser'
]

exclude_patterns = ['_build', 'Thumbs.db', '.DS_Store']

autodoc_member_order = 'bysource'
autodoc_typehints = 'description'

# docstrings use numpy-style sections
napoleon_google_docstring = False
napoleon_numpy_docstring = True

intersphinx_mapping = {
    'python': ('https://docs.python.org/3', None),
    'numpy': ('https://numpy.org/doc/stable/', None),
}


# -- Options for HTML output -------------------------------------------------

html_theme = 'sphinx_rtd_theme'
