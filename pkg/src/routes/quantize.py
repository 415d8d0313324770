from flask import Blueprint, request, jsonify
import logging

from src.engine.errors import BiQGemmError
from src.engine.quantizer import dequantize, quantization_error, quantize_greedy
from src.models.matrix import DenseMatrix

quantize_bp = Blueprint('quantize', __name__)
logger = logging.getLogger(__name__)


def missing_fields(data, required_fields):
    for field in required_fields:
        if field not in data:
            return jsonify({'error': f'Missing required field: {field}'}), 400
    return None


@quantize_bp.route('', methods=['POST'])
def quantize_matrix():
    """Greedy binary-coding quantization of a weight matrix"""
    try:
        data = request.get_json(silent=True) or {}
        error = missing_fields(data, ['weights', 'beta'])
        if error:
            return error

        W = DenseMatrix.from_rows(data['weights'], precision=data.get('precision', 64))
        q = quantize_greedy(W, int(data['beta']))

        logger.info(f"Quantized {W.rows}x{W.cols} matrix with beta={q.beta}")

        return jsonify({
            'success': True,
            'm': q.m,
            'n': q.n,
            'beta': q.beta,
            'planes': [p.signs.tolist() for p in q.planes],
            'alphas': q.alphas.tolist(),
            'dequantized': dequantize(q).to_list(),
            'error': quantization_error(W, q),
        })

    except BiQGemmError as e:
        return jsonify({'error': str(e)}), 400
    except Exception as e:
        logger.error(f"Error quantizing matrix: {str(e)}")
        return jsonify({'error': str(e)}), 500
