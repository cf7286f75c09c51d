# Tests live inside the package modules; keep the entry point out of collection.
collect_ignore = ["setup.py", "whittakeroperators/__main__.py"]
