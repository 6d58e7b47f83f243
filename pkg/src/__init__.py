# CSL cosmology toolkit
