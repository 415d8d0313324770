from flask import Blueprint, request, jsonify
import logging

from src.engine.bench import BenchConfig, run_benchmark
from src.engine.errors import BiQGemmError
from src.engine.verify import VerifyConfig, verify
from src.models.record import BenchmarkRecord, db

bench_bp = Blueprint('bench', __name__)
logger = logging.getLogger(__name__)

LIST_FIELDS = ('m', 'n', 'b', 'beta', 'mu', 'threads')
SCALAR_FIELDS = ('repeats', 'warmup', 'seed', 'budget_bytes', 'deterministic', 'precision')


def as_tuple(value):
    return tuple(value) if isinstance(value, (list, tuple)) else (value,)


@bench_bp.route('/run', methods=['POST'])
def run():
    """Run a benchmark sweep and store every record"""
    try:
        data = request.get_json(silent=True) or {}
        options = {f: as_tuple(data[f]) for f in LIST_FIELDS if f in data}
        options.update({f: data[f] for f in SCALAR_FIELDS if f in data})
        if 'methods' in data:
            options['methods'] = as_tuple(data['methods'])

        records = run_benchmark(BenchConfig(**options))

        rows = [BenchmarkRecord.from_bench(r) for r in records]
        db.session.add_all(rows)
        db.session.commit()

        logger.info(f"Stored {len(rows)} benchmark records")

        return jsonify({
            'success': True,
            'records': [r.to_dict() for r in records],
            'total_count': len(records)
        }), 201

    except (BiQGemmError, TypeError) as e:
        return jsonify({'error': str(e)}), 400
    except Exception as e:
        logger.error(f"Error running benchmark: {str(e)}")
        return jsonify({'error': str(e)}), 500


@bench_bp.route('/records', methods=['GET'])
def get_records():
    """List stored benchmark records, optionally filtered by method"""
    query = BenchmarkRecord.query
    method = request.args.get('method')
    if method:
        query = query.filter_by(method=method)
    records = query.order_by(BenchmarkRecord.id).all()
    return jsonify({
        'records': [r.to_dict() for r in records],
        'total_count': len(records)
    })


@bench_bp.route('/verify', methods=['POST'])
def run_verify():
    """Run the acceptance checks"""
    try:
        data = request.get_json(silent=True) or {}
        options = {f: data[f] for f in ('seed', 'oracle_cases', 'lut_vectors', 'counter_shapes',
                                        'quantizer_cases', 'tiling_shapes', 'model_cases') if f in data}
        if 'mus' in data:
            options['mus'] = as_tuple(data['mus'])
        report = verify(VerifyConfig(**options))
        return jsonify(report.to_dict()), 200 if report.passed else 422

    except BiQGemmError as e:
        return jsonify({'error': str(e)}), 400
    except Exception as e:
        logger.error(f"Error running verify: {str(e)}")
        return jsonify({'error': str(e)}), 500
