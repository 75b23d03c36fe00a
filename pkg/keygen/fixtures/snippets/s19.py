from collections import Counter
c = Counter("mississippi")
print(c.most_common(2))
