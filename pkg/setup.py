"""setup.py for crvec"""

from setuptools import setup


setup(
    name="crvec",
    version="1.0.0",
    author="IMayBeABitShy",
    description="Correctly rounded lane-parallel exp2 and log kernels with their oracle and verification harness",
    long_description=open("README.md").read(),
    long_description_content_type="text/markdown",
    license="MIT",
    keywords="floating-point correct-rounding exp2 log SIMD libm",
    classifiers=[
        "License :: OSI Approved :: MIT License",
        "Programming Language :: Python",
        "Development Status :: 3 - Alpha",
        "Programming Language :: Python :: 3",
        "Topic :: Scientific/Engineering :: Mathematics",
        ],
    packages=[
        "crvec",
        "crvec.fp",
        "crvec.vlanes",
        "crvec.oracle",
        "crvec.coeffgen",
        "crvec.kernels",
        "crvec.verify",
        "crvec.bench",
        ],
    package_data={
        "crvec": ["resources/*.txt", "resources/*.sh", "resources/corpus/*.txt"],
        "crvec.coeffgen": ["templates/*.jinja"],
        "crvec.verify": ["templates/*.jinja"],
        "crvec.bench": ["templates/*.jinja"],
    },
    include_package_data=True,
    python_requires=">=3.8",
    install_requires=[
        "numpy",
        "mpmath",
        "jinja2",
        "fs",
        ],
    extras_require={
        "integration": [
            "psutil",
            "setproctitle",
        ],
        "test": [
            "pytest",
        ],
    },
    entry_points={
        "console_scripts": [
            "crvec=crvec.cli:main",
        ],
    }
    )
