"""Monte Carlo experiment harness: configurations, scenarios, replicas and run manifests"""
