"""Independent reference for the corruption golden digests.

Re-implements the fixture, the xoshiro256++ stream and every corruption
directly from their definitions and prints SHA-256 digests of the raw RGB
bytes. Run: python3 tools/oracles/golden.py
"""
import hashlib
import math

M = (1 << 64) - 1
W = H = 64


def fixture():
    px = []
    for y in range(H):
        for x in range(W):
            px.append([(x * 4) % 256, (y * 4) % 256, (x * y + 3 * x + 7 * y) % 256])
    return px


def splitmix(seed):
    s = seed
    while True:
        s = (s + 0x9E3779B97F4A7C15) & M
        z = s
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & M
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & M
        yield z ^ (z >> 31)


def rotl(x, k):
    return ((x << k) | (x >> (64 - k))) & M


class Xoshiro:
    def __init__(self, seed):
        g = splitmix(seed)
        self.s = [next(g) for _ in range(4)]

    def next(self):
        s = self.s
        r = (rotl((s[0] + s[3]) & M, 23) + s[0]) & M
        t = (s[1] << 17) & M
        s[2] ^= s[0]
        s[3] ^= s[1]
        s[1] ^= s[2]
        s[0] ^= s[3]
        s[2] ^= t
        s[3] = rotl(s[3], 45)
        return r

    def uniform(self):
        return (self.next() >> 11) * 2.0 ** -53

    def below(self, n):
        thr = ((1 << 64) - n) % n
        while True:
            m = self.next() * n
            if (m & M) >= thr:
                return m >> 64

    def normal(self):
        u1 = 1.0 - self.uniform()
        u2 = self.uniform()
        return math.sqrt(-2.0 * math.log(u1)) * math.cos(2 * math.pi * u2)


def quant(v):
    if v != v:
        return 0
    r = math.floor(abs(v) + 0.5) * (1 if v >= 0 else -1)
    return int(min(255, max(0, r)))


def kernel(sigma):
    r = math.ceil(3 * sigma)
    k = [math.exp(-(x * x) / (2 * sigma * sigma)) for x in range(-r, r + 1)]
    s = 0.0
    for w in k:
        s += w
    return [w / s for w in k]


def blur_plane(plane, sigma):
    if sigma <= 0:
        return plane
    k = kernel(sigma)
    r = len(k) // 2
    tmp = [[0.0] * 3 for _ in plane]
    for y in range(H):
        for x in range(W):
            acc = [0.0, 0.0, 0.0]
            for i, w in enumerate(k):
                sx = min(W - 1, max(0, x + i - r))
                for c in range(3):
                    acc[c] += w * plane[y * W + sx][c]
            tmp[y * W + x] = acc
    out = [None] * len(plane)
    for y in range(H):
        for x in range(W):
            acc = [0.0, 0.0, 0.0]
            for i, w in enumerate(k):
                sy = min(H - 1, max(0, y + i - r))
                for c in range(3):
                    acc[c] += w * tmp[sy * W + x][c]
            out[y * W + x] = acc
    return out


def to_bytes(px):
    return bytes(v for p in px for v in p)


def noise(img, degree, rng):
    sigma = 10.0 * degree
    if sigma <= 0:
        return img
    return [[quant(c + sigma * rng.normal()) for c in p] for p in img]


def blur(img, degree, rng):
    if degree == 0:
        return img
    return [[quant(c) for c in p] for p in blur_plane([[float(c) for c in p] for p in img], float(degree))]


FOG = {"low": (0.10, 1.0), "medium": (0.25, 2.5), "high": (0.40, 5.0)}
SNOW = {"low": 0.03, "medium": 0.08, "high": 0.15}
FLARE = {"low": (0.05, 120.0, 4), "medium": (0.10, 180.0, 6), "high": (0.18, 255.0, 8)}


def fog(img, level, rng):
    a, s = FOG[level]
    plane = [[(1.0 - a) * c + a * 255.0 for c in p] for p in img]
    return [[quant(c) for c in p] for p in blur_plane(plane, s)]


def snow(img, level, rng):
    n = len(img)
    count = math.floor(SNOW[level] * n)
    out = [list(p) for p in img]
    idx = list(range(n))
    for i in range(count):
        j = i + rng.below(n - i)
        idx[i], idx[j] = idx[j], idx[i]
        out[idx[i]] = [255, 255, 255]
    return out


def sunflare(img, level, rng):
    rf, gain, halos = FLARE[level]
    cx = rng.uniform() * W
    cy = rng.uniform() / 3.0 * H
    R = rf * math.sqrt(W * W + H * H)
    lights = [(cx, cy, R, gain)]
    for k in range(1, halos + 1):
        t = 1.5 * k / halos
        lights.append((cx + t * (W / 2 - cx), cy + t * (H / 2 - cy), 0.6 * R * (1 - (k - 1) / halos), 0.2 * gain))
    out = []
    for i, p in enumerate(img):
        x, y = float(i % W), float(i // W)
        add = 0.0
        for lx, ly, lr, st in lights:
            q = ((x - lx) ** 2 + (y - ly) ** 2) / (lr * lr)
            add += 0.0 if q >= 1 else st * (1 - q)
        out.append([quant(c + add) for c in p] if add > 0 else list(p))
    return out


KINDS = {"gaussian_noise": noise, "gaussian_blur": blur, "fog": fog, "sunflare": sunflare, "snow": snow}
SEEDS = [0, 1, 42]

if __name__ == "__main__":
    img = fixture()
    print("fixture", hashlib.sha256(to_bytes(img)).hexdigest())
    r = Xoshiro(42)
    print("stream42", [hex(r.next()) for _ in range(3)])
    for kind, f in KINDS.items():
        levels = range(6) if kind.startswith("gaussian") else ["low", "medium", "high"]
        for level in levels:
            for seed in SEEDS:
                out = f(img, level, Xoshiro(seed))
                print(f"{kind}/{level} {seed} {hashlib.sha256(to_bytes(out)).hexdigest()}")
