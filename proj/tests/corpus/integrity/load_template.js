const fs = require('fs');
const path = require('path');

/**
 * Loads a template by file name.
 * @param {string} file template file
 */
function loadTemplate(file) {
  const full = path.join(__dirname, 'templates', file);
  return fs.readFileSync(full, 'utf8');
}

module.exports = { loadTemplate };

// expect: ApiParam file 8 loadTemplate PathTrav 10
