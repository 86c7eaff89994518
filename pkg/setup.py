# minimal dynamic metadata are specified here. Static metadata are in "pyproject.toml".
import setuptools

setuptools.setup(
    install_requires=[
        'django>=2.2,<6.0',
        'numpy>=1.17',
        'scipy>=1.4',
    ],
)
