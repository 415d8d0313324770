from datetime import datetime

from flask_sqlalchemy import SQLAlchemy

db = SQLAlchemy()


class BenchmarkRecord(db.Model):
    """One (scenario, method) row of a benchmark run."""
    id = db.Column(db.Integer, primary_key=True)
    created = db.Column(db.DateTime, default=datetime.utcnow, nullable=False)
    seed = db.Column(db.Integer, nullable=False)
    m = db.Column(db.Integer, nullable=False)
    n = db.Column(db.Integer, nullable=False)
    b = db.Column(db.Integer, nullable=False)
    beta = db.Column(db.Integer, nullable=False)
    mu = db.Column(db.Integer, nullable=False)
    threads = db.Column(db.Integer, nullable=False)
    method = db.Column(db.String(32), nullable=False)
    median_s = db.Column(db.Float, nullable=False)
    build_s = db.Column(db.Float)
    query_s = db.Column(db.Float)
    replace_s = db.Column(db.Float)
    lookups = db.Column(db.BigInteger, default=0)
    lut_build_ops = db.Column(db.BigInteger, default=0)
    fma_ops = db.Column(db.BigInteger, default=0)
    correct = db.Column(db.Boolean, default=True)
    checksum = db.Column(db.String(16), default='')

    def __repr__(self):
        return f'<BenchmarkRecord {self.method} {self.m}x{self.n}x{self.b}>'

    @classmethod
    def from_bench(cls, record):
        return cls(**{column: getattr(record, column) for column in (
            'seed', 'm', 'n', 'b', 'beta', 'mu', 'threads', 'method', 'median_s', 'build_s',
            'query_s', 'replace_s', 'lookups', 'lut_build_ops', 'fma_ops', 'correct', 'checksum')})

    def to_dict(self):
        return {
            'id': self.id,
            'created': self.created.isoformat() if self.created else None,
            'seed': self.seed,
            'm': self.m,
            'n': self.n,
            'b': self.b,
            'beta': self.beta,
            'mu': self.mu,
            'threads': self.threads,
            'method': self.method,
            'median_s': self.median_s,
            'phases': {'build': self.build_s, 'query': self.query_s, 'replace': self.replace_s},
            'lookups': self.lookups,
            'lut_build_ops': self.lut_build_ops,
            'fma_ops': self.fma_ops,
            'correct': self.correct,
            'checksum': self.checksum,
        }
