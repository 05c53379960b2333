# Reference package
