# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""GMP-backed continued-fraction kernels (Lehmer's method).

Mirrors ``cfdim._purekernel`` exactly; ``cf_digit_sum`` runs without the GIL
so Monte Carlo workers can share a thread pool.
"""

from libc.stdlib cimport malloc, free

cdef extern from "gmp.h":
    ctypedef struct __mpz_struct:
        pass
    ctypedef __mpz_struct mpz_t[1]
    ctypedef unsigned long mp_bitcnt_t

    void mpz_init(mpz_t) nogil
    void mpz_clear(mpz_t) nogil
    void mpz_set(mpz_t, const mpz_t) nogil
    void mpz_set_ui(mpz_t, unsigned long) nogil
    void mpz_swap(mpz_t, mpz_t) nogil
    int mpz_sgn(const mpz_t) nogil
    int mpz_cmp(const mpz_t, const mpz_t) nogil
    int mpz_cmp_ui(const mpz_t, unsigned long) nogil
    size_t mpz_sizeinbase(const mpz_t, int) nogil
    unsigned long mpz_get_ui(const mpz_t) nogil
    void mpz_fdiv_q_2exp(mpz_t, const mpz_t, mp_bitcnt_t) nogil
    void mpz_tdiv_qr(mpz_t, mpz_t, const mpz_t, const mpz_t) nogil
    void mpz_mul_si(mpz_t, const mpz_t, long) nogil
    void mpz_addmul_ui(mpz_t, const mpz_t, unsigned long) nogil
    void mpz_submul_ui(mpz_t, const mpz_t, unsigned long) nogil
    void mpz_add(mpz_t, const mpz_t, const mpz_t) nogil
    void mpz_add_ui(mpz_t, const mpz_t, unsigned long) nogil
    void mpz_import(mpz_t, size_t, int, size_t, int, size_t, const void *) nogil
    void *mpz_export(void *, size_t *, int, size_t, int, size_t, const mpz_t) nogil

cdef enum:
    WORD = 60


cdef void _from_py(mpz_t z, object x) except *:
    cdef bytes raw = x.to_bytes((x.bit_length() + 7) // 8 or 1, "big")
    mpz_import(z, len(raw), 1, 1, 1, 0, <const char *>raw)


cdef object _to_py(const mpz_t z):
    cdef size_t nbytes = (mpz_sizeinbase(z, 2) + 7) // 8
    cdef size_t count = 0
    cdef unsigned char *buf
    if mpz_sgn(z) == 0:
        return 0
    buf = <unsigned char *>malloc(nbytes)
    if buf == NULL:
        raise MemoryError()
    try:
        mpz_export(buf, &count, 1, 1, 1, 0, z)
        return int.from_bytes(buf[:count], "big")
    finally:
        free(buf)


cdef struct Cofactors:
    long long A, B, C, D


cdef inline unsigned long long _word_of(const mpz_t z, size_t h) nogil:
    cdef mpz_t t
    cdef unsigned long long w
    mpz_init(t)
    mpz_fdiv_q_2exp(t, z, h)
    w = mpz_get_ui(t)
    mpz_clear(t)
    return w


cdef inline void _apply(mpz_t a, mpz_t b, mpz_t t1, mpz_t t2, Cofactors *m) nogil:
    # (a, b) <- (A a + B b, C a + D b); one of A, B (and of C, D) is negative
    mpz_mul_si(t1, a, m.A)
    if m.B >= 0:
        mpz_addmul_ui(t1, b, <unsigned long>m.B)
    else:
        mpz_submul_ui(t1, b, <unsigned long>(-m.B))
    mpz_mul_si(t2, a, m.C)
    if m.D >= 0:
        mpz_addmul_ui(t2, b, <unsigned long>m.D)
    else:
        mpz_submul_ui(t2, b, <unsigned long>(-m.D))
    mpz_swap(a, t1)
    mpz_swap(b, t2)


cdef struct SumState:
    unsigned long long small_max
    long long count
    int terminated


cdef void _sum_loop(mpz_t a, mpz_t b, long long n, mpz_t total, mpz_t big_max,
                    SumState *st) nogil:
    cdef mpz_t t1, t2, qq, rr
    cdef size_t abits, h
    cdef unsigned long long ua, ub, uq, ur
    cdef long long ah, bh, q, q2, T
    cdef Cofactors m
    cdef long long batch
    mpz_init(t1)
    mpz_init(t2)
    mpz_init(qq)
    mpz_init(rr)
    while st.count < n and mpz_sgn(b) != 0:
        abits = mpz_sizeinbase(a, 2)
        if abits <= WORD:
            ua = mpz_get_ui(a)
            ub = mpz_get_ui(b)
            while st.count < n and ub != 0:
                uq = ua // ub
                ur = ua - uq * ub
                mpz_add_ui(total, total, uq)
                if uq > st.small_max:
                    st.small_max = uq
                st.count += 1
                ua = ub
                ub = ur
            mpz_set_ui(a, ua)
            mpz_set_ui(b, ub)
            break
        h = abits - WORD
        ah = <long long>_word_of(a, h)
        bh = <long long>_word_of(b, h)
        m.A = 1
        m.B = 0
        m.C = 0
        m.D = 1
        batch = 0
        while st.count + batch < n:
            if bh + m.C <= 0 or bh + m.D <= 0 or ah + m.A < 0 or ah + m.B < 0:
                break
            q = (ah + m.A) // (bh + m.C)
            q2 = (ah + m.B) // (bh + m.D)
            if q != q2:
                break
            T = m.A - q * m.C
            m.A = m.C
            m.C = T
            T = m.B - q * m.D
            m.B = m.D
            m.D = T
            T = ah - q * bh
            ah = bh
            bh = T
            mpz_add_ui(total, total, <unsigned long>q)
            if <unsigned long long>q > st.small_max:
                st.small_max = <unsigned long long>q
            batch += 1
        if batch == 0:
            mpz_tdiv_qr(qq, rr, a, b)
            mpz_add(total, total, qq)
            if mpz_cmp(qq, big_max) > 0:
                mpz_set(big_max, qq)
            mpz_swap(a, b)
            mpz_swap(b, rr)
            st.count += 1
        else:
            st.count += batch
            _apply(a, b, t1, t2, &m)
    st.terminated = mpz_sgn(b) == 0
    mpz_clear(t1)
    mpz_clear(t2)
    mpz_clear(qq)
    mpz_clear(rr)


def _check(p, q, n):
    if not (0 < p <= q):
        raise ValueError("kernel expects 0 < p <= q")
    if n < 0:
        raise ValueError("n must be non-negative")


def cf_digit_sum(p, q, long long n):
    """Return ``(S, T, count, terminated)``: sum and max of up to ``n`` quotients."""
    _check(p, q, n)
    cdef mpz_t a, b, total, big_max
    cdef SumState st
    st.small_max = 0
    st.count = 0
    st.terminated = 0
    mpz_init(a)
    mpz_init(b)
    mpz_init(total)
    mpz_init(big_max)
    try:
        _from_py(a, q)
        _from_py(b, p)
        with nogil:
            _sum_loop(a, b, n, total, big_max, &st)
        total_py = _to_py(total)
        if mpz_cmp_ui(big_max, st.small_max) > 0:
            tmax = _to_py(big_max)
        else:
            tmax = st.small_max
        return total_py, tmax, st.count, bool(st.terminated)
    finally:
        mpz_clear(a)
        mpz_clear(b)
        mpz_clear(total)
        mpz_clear(big_max)


def cf_expand(p, q, long long n):
    """Return ``(digits, terminated)`` for the first ``n`` quotients of p/q."""
    _check(p, q, n)
    cdef mpz_t a, b, t1, t2, qq, rr
    cdef size_t abits, h
    cdef unsigned long long ua, ub, uq, ur
    cdef long long ah, bh, q1, q2, T
    cdef Cofactors m
    cdef long long count = 0
    cdef long long batch
    digits = []
    mpz_init(a)
    mpz_init(b)
    mpz_init(t1)
    mpz_init(t2)
    mpz_init(qq)
    mpz_init(rr)
    try:
        _from_py(a, q)
        _from_py(b, p)
        while count < n and mpz_sgn(b) != 0:
            abits = mpz_sizeinbase(a, 2)
            if abits <= WORD:
                ua = mpz_get_ui(a)
                ub = mpz_get_ui(b)
                while count < n and ub != 0:
                    uq = ua // ub
                    ur = ua - uq * ub
                    digits.append(uq)
                    count += 1
                    ua = ub
                    ub = ur
                mpz_set_ui(a, ua)
                mpz_set_ui(b, ub)
                break
            h = abits - WORD
            ah = <long long>_word_of(a, h)
            bh = <long long>_word_of(b, h)
            m.A = 1
            m.B = 0
            m.C = 0
            m.D = 1
            batch = 0
            while count + batch < n:
                if bh + m.C <= 0 or bh + m.D <= 0 or ah + m.A < 0 or ah + m.B < 0:
                    break
                q1 = (ah + m.A) // (bh + m.C)
                q2 = (ah + m.B) // (bh + m.D)
                if q1 != q2:
                    break
                T = m.A - q1 * m.C
                m.A = m.C
                m.C = T
                T = m.B - q1 * m.D
                m.B = m.D
                m.D = T
                T = ah - q1 * bh
                ah = bh
                bh = T
                digits.append(q1)
                batch += 1
            if batch == 0:
                mpz_tdiv_qr(qq, rr, a, b)
                digits.append(_to_py(qq))
                mpz_swap(a, b)
                mpz_swap(b, rr)
                count += 1
            else:
                count += batch
                _apply(a, b, t1, t2, &m)
        return digits, mpz_sgn(b) == 0
    finally:
        mpz_clear(a)
        mpz_clear(b)
        mpz_clear(t1)
        mpz_clear(t2)
        mpz_clear(qq)
        mpz_clear(rr)
