const { execSync } = require('child_process');

function version(binary) {
  binary = 'node';
  return execSync(binary + ' --version').toString();
}

function hostname() {
  return execSync('hostname').toString();
}

module.exports = { version, hostname };

// expect: ApiParam binary 3 version None -
