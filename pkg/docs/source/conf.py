# -*- coding: utf-8 -*-
#
# quatspec documentation build configuration file.
#
# This file is execfile()d with the current directory set to its containing dir.

import sys, os

# The package lives under src/, two levels up from this directory.
sys.path.insert(0, os.path.abspath('../../src'))

import quatspec

# -- General configuration -----------------------------------------------------

extensions = ['sphinx.ext.autodoc', 'sphinx.ext.doctest', 'sphinx.ext.intersphinx', 'sphinx.ext.coverage',
              'sphinx.ext.mathjax', 'sphinx.ext.viewcode']

templates_path = ['_templates']

source_suffix = '.rst'

master_doc = 'index'

project = u'quatspec'
copyright = u'2024, the quatspec developers'

# The short X.Y version.
version = quatspec.__version__
# The full version, including alpha/beta/rc tags.
release = version

exclude_patterns = []

pygments_style = 'sphinx'

autodoc_member_order = 'bysource'

# -- Options for HTML output ---------------------------------------------------

html_theme = 'default'

htmlhelp_basename = 'quatspecdoc'

# -- Options for LaTeX output --------------------------------------------------

latex_elements = {
}

latex_documents = [
  ('index', 'quatspec.tex', u'quatspec Documentation',
   u'the quatspec developers', 'manual'),
]

# -- Options for manual page output --------------------------------------------

man_pages = [
    ('index', 'quatspec', u'quatspec Documentation',
     [u'the quatspec developers'], 1)
]

intersphinx_mapping = {
    'python': ('https://docs.python.org/3', None),
    'numpy': ('https://numpy.org/doc/stable/', None),
    'scipy': ('https://docs.scipy.org/doc/scipy/', None),
}
