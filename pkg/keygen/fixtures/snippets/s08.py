d = {"a": 1, "b": 2}
for k, v in sorted(d.items()):
    print(k, v)
