namespace dessin {}
