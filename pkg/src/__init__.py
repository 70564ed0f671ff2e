# Burgers Tiles Package
