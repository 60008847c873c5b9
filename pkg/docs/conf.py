#!/usr/bin/env python
#
# influence_toolbox documentation build configuration file.
# Only the html, latex and man builders are configured; everything else uses the
# sphinx defaults.

import os
import sys

sys.path.insert(0, os.path.abspath('..'))

import influence_toolbox  # noqa: E402

extensions = ['sphinx.ext.autodoc', 'sphinx.ext.viewcode']
autodoc_member_order = 'bysource'

source_suffix = '.rst'
master_doc = 'index'

project = 'Toolbox for influence analysis on citation networks'
copyright = "2026, Haigang Liu"
author = "Haigang Liu"

# the short X.Y version and the full release both follow the package
version = influence_toolbox.__version__
release = influence_toolbox.__version__

exclude_patterns = ['_build', 'Thumbs.db', '.DS_Store']
pygments_style = 'sphinx'

html_theme = 'alabaster'
htmlhelp_basename = 'influence_toolboxdoc'

_title = f'{project} Documentation'

latex_documents = [
    (master_doc, 'influence_toolbox.tex', _title, author, 'manual'),
]

man_pages = [
    (master_doc, 'influence-toolbox', _title, [author], 1),
]
