# Sphinx configuration for series-lab.
import os
import sys

sys.path.insert(0, os.path.abspath(".."))

project = "series-lab"
copyright = "2026, series-lab contributors"
author = "series-lab contributors"
version = "0.1"
release = "0.1.0"

extensions = [
    "sphinx.ext.autodoc",
    "sphinx.ext.napoleon",
    "sphinx.ext.mathjax",
]

templates_path = ["_templates"]
source_suffix = ".rst"
master_doc = "index"
language = None
exclude_patterns = ["_build", "Thumbs.db", ".DS_Store"]
pygments_style = None

autodoc_member_order = "bysource"

html_theme = "alabaster"
html_theme_options = {
    "description": "Exponential and Euler transforms of counting sequences",
    "extra_nav_links": {"Index": "genindex.html"},
}
html_sidebars = {"**": ["about.html", "navigation.html", "searchbox.html"]}
htmlhelp_basename = "series-labdoc"
