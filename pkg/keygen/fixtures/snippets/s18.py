primes = [n for n in range(2, 30) if all(n % d for d in range(2, n))]
print(primes)
