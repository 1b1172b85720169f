from setuptools import setup

setup(
    name='certified_deletion',
    version='1.0',
    packages=['tests', 'certified_deletion'],
    scripts=['bin/certified_deletion'],
    install_requires=['numpy>=1.25', 'scipy>=1.9'],
    url='',
    license='BSD 3-Clause',
    author='ksletmoe',
    author_email='kyle.sletmoe@gmail.com',
    description='A simulator for prepare-and-measure quantum encryption with certified deletion: key and '
                'ciphertext lifecycle, security-bound planning, and Monte-Carlo and exact attack games',
)
