from flask import Blueprint, Response, request, jsonify
import logging

from src.engine.config import DEFAULT_MU
from src.engine.errors import BiQGemmError
from src.engine.model_io import footprint, load, save
from src.engine.quantizer import quantize_greedy
from src.models.matrix import DenseMatrix
from src.routes.quantize import missing_fields

model_bp = Blueprint('model', __name__)
logger = logging.getLogger(__name__)


@model_bp.route('/footprint', methods=['POST'])
def model_footprint():
    """Memory usage of weights, activations and outputs"""
    try:
        data = request.get_json(silent=True) or {}
        error = missing_fields(data, ['m', 'n', 'bits'])
        if error:
            return error

        result = footprint(int(data['m']), int(data['n']), int(data['bits']),
                           batch=int(data.get('batch', 18)))
        return jsonify(result.to_dict())

    except BiQGemmError as e:
        return jsonify({'error': str(e)}), 400
    except Exception as e:
        logger.error(f"Error computing footprint: {str(e)}")
        return jsonify({'error': str(e)}), 500


@model_bp.route('/save', methods=['POST'])
def save_model():
    """Quantize weights and return them as a BQGM model file"""
    try:
        data = request.get_json(silent=True) or {}
        error = missing_fields(data, ['weights', 'beta'])
        if error:
            return error

        q = quantize_greedy(DenseMatrix.from_rows(data['weights'], precision=32), int(data['beta']))
        payload = save(q, int(data.get('mu', DEFAULT_MU)))
        return Response(payload, mimetype='application/octet-stream',
                        headers={'Content-Disposition': 'attachment; filename=model.bqgm'})

    except BiQGemmError as e:
        return jsonify({'error': str(e)}), 400
    except Exception as e:
        logger.error(f"Error saving model: {str(e)}")
        return jsonify({'error': str(e)}), 500


@model_bp.route('/inspect', methods=['POST'])
def inspect_model():
    """Validate an uploaded model file and summarise its header"""
    try:
        loaded = load(request.get_data())
        return jsonify({
            'success': True,
            'header': loaded.header.to_dict(),
            'alphas': loaded.quantized.alphas.tolist(),
        })

    except BiQGemmError as e:
        logger.error(f"Rejected model file: {str(e)}")
        return jsonify({'error': str(e), 'type': type(e).__name__}), 400
    except Exception as e:
        logger.error(f"Error inspecting model: {str(e)}")
        return jsonify({'error': str(e)}), 500
