squares = [i * i for i in range(6)]
print(sum(squares))
