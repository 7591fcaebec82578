"""
Services package.
Superoperators, trajectory simulation, the analytic correlation engine and the Monte Carlo estimator.
"""
