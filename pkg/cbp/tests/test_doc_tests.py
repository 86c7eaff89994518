"""Doctests that can be selected by 'manage.py test cbp.tests.test_doc_tests'"""
import doctest

doc_tests = [
    doctest.DocTestSuite('cbp.io'),
    doctest.DocTestSuite('cbp.lpp'),
]


def load_tests(loader, tests, ignore):
    """Add doctests to unittests"""
    # pylint:disable=unused-argument
    tests.addTests(doc_tests)
    return tests
