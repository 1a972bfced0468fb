# Configuration file for the Sphinx documentation builder.
# autodoc imports pshlab, so it must be installed into the environment running
# sphinx (see requirements_docs.txt).

# -- Project information -----------------------------------------------------
project = "pshlab"
copyright = "2026, the pshlab developers"  # pylint:disable=redefined-builtin
author = "the pshlab developers"

# The version is determined by the vcs tags.


# -- General configuration ---------------------------------------------------
extensions = ["sphinx.ext.autodoc", "sphinx.ext.napoleon", "sphinx.ext.autosummary", "sphinx.ext.mathjax"]

templates_path = ["templates"]

exclude_patterns = []

# -- Options for HTML output -------------------------------------------------
html_theme = "sphinx_rtd_theme"

html_theme_options = {
    "navigation_depth": 3,
}

html_static_path = []

autodoc_member_order = "bysource"
autoclass_content = "both"
autosummary_generate = True

# Napoleon settings
napoleon_google_docstring = True
napoleon_numpy_docstring = False
napoleon_include_init_with_doc = False
napoleon_include_private_with_doc = False
napoleon_include_special_with_doc = True
napoleon_use_param = True
napoleon_use_rtype = True
napoleon_attr_annotations = True
