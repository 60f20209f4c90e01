# Configuration file for the Sphinx documentation builder.
#
# http://www.sphinx-doc.org/en/master/config

# -- Project information -----------------------------------------------------

project = u'growthrate'
copyright = u'2026, growthrate developers'
author = u'growthrate developers'

version = u''
release = u''


# -- General configuration ---------------------------------------------------

extensions = []

templates_path = ['_templates']

source_suffix = '.rst'

master_doc = 'index'

language = 'en'

exclude_patterns = [u'_build', 'Thumbs.db', '.DS_Store']

pygments_style = None


# -- Options for HTML output -------------------------------------------------

html_theme = 'alabaster'
