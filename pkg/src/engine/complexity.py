"""Closed-form operation counts the kernel counters are checked against."""
from src.engine.lut import dp_op_count, naive_op_count


def groups(n, mu):
    return -(-n // mu)


def lut_build_ops(n, b, mu, builder='dp'):
    per_table = dp_op_count(mu) if builder == 'dp' else naive_op_count(mu)
    return per_table * groups(n, mu) * b


def lookups(m, n, b, mu, beta=1):
    return m * groups(n, mu) * b * beta


def dense_fma(m, n, b, beta=1):
    return m * n * b * beta


def biqgemm_ops(m, n, b, mu, beta=1, builder='dp'):
    return lut_build_ops(n, b, mu, builder) + lookups(m, n, b, mu, beta)


def predicted_reduction(m, mu):
    """How many times fewer ops than GEMM: m*mu / (2**mu + m)."""
    return m * mu / ((1 << mu) + m)
