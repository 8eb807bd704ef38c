version = (0, 3, 0)
display_version = ".".join(str(i) for i in version)
