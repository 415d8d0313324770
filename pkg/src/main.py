import os
import sys
# DON'T CHANGE THIS !!!
sys.path.insert(0, os.path.dirname(os.path.dirname(__file__)))

from flask import Flask, jsonify
from flask_cors import CORS
from src.cli import bench_command
from src.engine.bench import METHODS
from src.engine.config import DEFAULT_BUDGET_BYTES, DEFAULT_MU, MAX_MU
from src.models.record import db
from src.routes.quantize import quantize_bp
from src.routes.gemm import gemm_bp
from src.routes.model import model_bp
from src.routes.bench import bench_bp
import logging
from datetime import datetime

VERSION = '1.0.0'

# Configure logging
logging.basicConfig(level=logging.INFO)
logger = logging.getLogger(__name__)


def create_app(test_config=None):
    app = Flask(__name__)

    # Enable CORS for all routes
    CORS(app)

    default_db = f"sqlite:///{os.path.join(os.path.dirname(__file__), 'database', 'app.db')}"
    app.config['SQLALCHEMY_DATABASE_URI'] = os.environ.get('DATABASE_URL', default_db)
    app.config['SQLALCHEMY_TRACK_MODIFICATIONS'] = False
    app.config['BIQGEMM_BUDGET_BYTES'] = int(os.environ.get('BIQGEMM_BUDGET_BYTES', DEFAULT_BUDGET_BYTES))
    if test_config:
        app.config.update(test_config)

    if app.config['SQLALCHEMY_DATABASE_URI'] == default_db:
        os.makedirs(os.path.join(os.path.dirname(__file__), 'database'), exist_ok=True)

    # Register all blueprints
    app.register_blueprint(quantize_bp, url_prefix='/api/quantize')
    app.register_blueprint(gemm_bp, url_prefix='/api/gemm')
    app.register_blueprint(model_bp, url_prefix='/api/models')
    app.register_blueprint(bench_bp, url_prefix='/api/bench')

    app.cli.add_command(bench_command)

    db.init_app(app)
    with app.app_context():
        db.create_all()

    @app.route('/api/health', methods=['GET'])
    def health_check():
        """Health check endpoint for monitoring"""
        return jsonify({
            'status': 'healthy',
            'timestamp': datetime.utcnow().isoformat(),
            'version': VERSION,
            'methods': list(METHODS),
            'defaults': {
                'mu': DEFAULT_MU,
                'max_mu': MAX_MU,
                'budget_bytes': app.config['BIQGEMM_BUDGET_BYTES'],
            }
        })

    return app


if __name__ == '__main__':
    logger.info("Starting BiQGEMM benchmark service...")
    create_app().run(host='0.0.0.0', port=5001, debug=True)
