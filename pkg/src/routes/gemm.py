from flask import Blueprint, current_app, request, jsonify
import logging

from src.engine import complexity
from src.engine.config import DEFAULT_MU, KernelConfig
from src.engine.errors import BiQGemmError
from src.engine.kernel import biqgemm
from src.engine.quantizer import quantize_greedy
from src.models.matrix import DenseMatrix
from src.routes.quantize import missing_fields

gemm_bp = Blueprint('gemm', __name__)
logger = logging.getLogger(__name__)


@gemm_bp.route('', methods=['POST'])
def multiply():
    """Quantize the weights and multiply them with the inputs through lookup tables"""
    try:
        data = request.get_json(silent=True) or {}
        error = missing_fields(data, ['weights', 'beta', 'inputs'])
        if error:
            return error

        precision = data.get('precision', 64)
        W = DenseMatrix.from_rows(data['weights'], precision=precision)
        X = DenseMatrix.from_rows(data['inputs'], precision=precision)
        mu = int(data.get('mu', DEFAULT_MU))
        config = KernelConfig(
            budget_bytes=int(data.get('budget_bytes', current_app.config['BIQGEMM_BUDGET_BYTES'])),
            builder=data.get('builder', 'dp'),
            profile=True,
        )

        q = quantize_greedy(W, int(data['beta']))
        result = biqgemm(q, X, config=config, mu=mu)

        logger.info(f"biqgemm {q.m}x{q.n}x{X.cols} beta={q.beta} mu={mu}: {result.counters.lookups} lookups")

        return jsonify({
            'success': True,
            'result': result.to_dict(),
            'predicted': {
                'lut_build_ops': complexity.lut_build_ops(q.n, X.cols, mu, config.builder),
                'lookups': complexity.lookups(q.m, q.n, X.cols, mu, q.beta),
                'dense_fma': complexity.dense_fma(q.m, q.n, X.cols, q.beta),
                'reduction': complexity.predicted_reduction(q.m, mu),
            },
        })

    except BiQGemmError as e:
        return jsonify({'error': str(e)}), 400
    except Exception as e:
        logger.error(f"Error running biqgemm: {str(e)}")
        return jsonify({'error': str(e)}), 500
