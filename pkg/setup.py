from setuptools import find_packages, setup

from wgedebayes import NAME, VERSION

# basic setup for pip install -e "."
setup(
    name=NAME,
    version=VERSION.lstrip('v'),
    packages=find_packages(exclude=['tests', 'scripts']),
    package_data={'wgedebayes': ['configs/*.json']},
    install_requires = [
        'scipy >= 1.9.1',
        'numpy >= 1.22.3',
        'pandas >= 1.5.0',
        'multiprocess',
        'pyyaml'
    ],
    extras_require={'test': ['pytest >= 7.0']},
    entry_points={'console_scripts': ['wgedebayes = wgedebayes.interface:run']},
)
