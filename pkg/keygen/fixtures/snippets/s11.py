words = "the quick brown fox".split()
print(len(words), max(words, key=len))
