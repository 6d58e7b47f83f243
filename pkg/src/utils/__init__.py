# Configuration, logging, errors and result files
