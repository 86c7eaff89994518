"""Test that the computational core of "cbp" runs without installed Django"""
