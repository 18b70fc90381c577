# Writes rows_1000.csv: 990 well-formed rows and 10 malformed ones
# (4 bad ASN tokens, 3 AS_SETs, 3 empty paths). Run once; output is committed.
import random

rng = random.Random(20220219)
pool = [174, 1299, 2914, 3216, 3356, 6939, 12389, 15895, 25133, 31133, 35320, 41330, 48593, 196645, 4200000123]
rows = []
for i in range(990):
    n = rng.randint(1, 6)
    path = []
    for _ in range(n):
        a = rng.choice(pool)
        path.extend([a] * (3 if rng.random() < 0.1 else 1))
    if i % 4 == 3:
        prefix = "2001:db8:%x::/48" % i
    else:
        prefix = "10.%d.%d.0/24" % (i // 256, i % 256)
    rows.append("%s,%s" % (prefix, " ".join(map(str, path))))
# a few exact duplicates
for i in (5, 77, 300):
    rows[i + 1] = rows[i]
bad = [
    "10.200.0.0/24,3356 AS1299 25133",
    "10.200.1.0/24,3356 12a 25133",
    "10.200.2.0/24,3356 -5",
    "10.200.3.0/24,6939 4294967296",
    "10.200.4.0/24,3356 {64512,64513}",
    '10.200.5.0/24,"174 {65001, 65002} 25133"',
    "10.200.6.0/24,{12389}",
    "10.200.7.0/24,",
    '10.200.8.0/24,""',
    "10.200.9.0/24,   ",
]
positions = sorted(rng.sample(range(1000), 10))
out, b, g = [], 0, 0
for pos in range(1000):
    if b < 10 and pos == positions[b]:
        out.append(bad[b])
        b += 1
    else:
        out.append(rows[g])
        g += 1
with open("rows_1000.csv", "w") as f:
    f.write("prefix,as_path\n")
    f.write("\n".join(out) + "\n")
