total = 0
for ch in "abcdef":
    total += ord(ch)
print(total)
