"""Pure-Python continued-fraction kernels.

Same algorithm and API as the compiled ``_cfkernel`` extension; used when the
extension is not built or ``CFDIM_PURE_PYTHON=1`` is set.

Both kernels expand ``p/q`` (``0 < p <= q``) with Lehmer's method: leading
machine words decide a batch of quotients, and the full-size integers are
updated once per batch with a 2x2 cofactor matrix.  The quotients are exactly
those of the plain Euclidean algorithm.
"""

_WORD = 60


def _lehmer_batch(ah, bh, limit):
    # Knuth, TAOCP vol. 2, Algorithm L (step L2/L3 only).
    A, B, C, D = 1, 0, 0, 1
    quotients = []
    while len(quotients) < limit:
        if bh + C <= 0 or bh + D <= 0 or ah + A < 0 or ah + B < 0:
            break
        q = (ah + A) // (bh + C)
        if q != (ah + B) // (bh + D):
            break
        A, C = C, A - q * C
        B, D = D, B - q * D
        ah, bh = bh, ah - q * bh
        quotients.append(q)
    return quotients, A, B, C, D


def _run(p, q, n, sink):
    """Feed the first ``n`` quotients of ``p/q`` to ``sink``; return count."""
    a, b = q, p
    count = 0
    while count < n and b:
        abits = a.bit_length()
        if abits <= _WORD:
            while count < n and b:
                qq, r = divmod(a, b)
                sink(qq)
                count += 1
                a, b = b, r
            break
        h = abits - _WORD
        quotients, A, B, C, D = _lehmer_batch(a >> h, b >> h, n - count)
        if not quotients:
            qq, r = divmod(a, b)
            sink(qq)
            count += 1
            a, b = b, r
            continue
        for qq in quotients:
            sink(qq)
        count += len(quotients)
        a, b = A * a + B * b, C * a + D * b
    return count, b == 0


def _check(p, q, n):
    if not (0 < p <= q):
        raise ValueError("kernel expects 0 < p <= q")
    if n < 0:
        raise ValueError("n must be non-negative")


def cf_expand(p, q, n):
    """Return ``(digits, terminated)`` for the first ``n`` quotients of p/q."""
    _check(p, q, n)
    digits = []
    _, done = _run(p, q, n, digits.append)
    return digits, done


def cf_digit_sum(p, q, n):
    """Return ``(S, T, count, terminated)``: sum and max of up to ``n`` quotients."""
    _check(p, q, n)
    acc = [0, 0]

    def sink(d):
        acc[0] += d
        if d > acc[1]:
            acc[1] = d

    count, done = _run(p, q, n, sink)
    return acc[0], acc[1], count, done
