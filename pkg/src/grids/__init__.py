# Grids package
