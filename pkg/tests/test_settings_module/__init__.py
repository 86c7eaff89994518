"""Settings taken from the module named by CBP_SETTINGS_MODULE"""
