s = "racecar"
print(s == s[::-1])
